//! Presented chart algebras: a finite slice of an E_r page.
//!
//! A chart lists named basis elements with (stem, filtration) and optionally
//! a motivic weight, plus a partial product table. A listed product with an
//! empty value is a genuine zero; an unlisted pair is UNKNOWN, never zero —
//! the deduction rules depend on that distinction.
//!
//! A chart also declares which stems it describes completely
//! (`complete_stems`). Inside that range an empty bidegree is an actual zero
//! group; outside it, absence of dots carries no information. Stems below
//! zero are always empty.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("cannot read chart {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse chart {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("chart is invalid:\n{}", .0.iter().map(|i| format!("  - {i}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<String>),
    #[error("inhomogeneous expression: {0}")]
    Inhomogeneous(String),
    #[error("unknown generator name {0:?}")]
    UnknownName(String),
}

/// Stem, Adams filtration, and optional motivic weight.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TriDegree {
    pub stem: i32,
    pub filt: u32,
    pub weight: Option<i32>,
}

impl TriDegree {
    pub fn new(stem: i32, filt: u32) -> Self {
        TriDegree {
            stem,
            filt,
            weight: None,
        }
    }

    pub fn with_weight(stem: i32, filt: u32, weight: i32) -> Self {
        TriDegree {
            stem,
            filt,
            weight: Some(weight),
        }
    }

    /// Degrees add under products; weights add when both are present.
    pub fn plus(&self, other: &TriDegree) -> TriDegree {
        TriDegree {
            stem: self.stem + other.stem,
            filt: self.filt + other.filt,
            weight: match (self.weight, other.weight) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        }
    }

    /// Target degree of `d_r`: stem drops by one, filtration climbs by `r`,
    /// weight carries over.
    pub fn d_target(&self, page: u32) -> TriDegree {
        TriDegree {
            stem: self.stem - 1,
            filt: self.filt + page,
            weight: self.weight,
        }
    }
}

impl fmt::Display for TriDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.weight {
            Some(w) => write!(f, "({}, {}, {})", self.stem, self.filt, w),
            None => write!(f, "({}, {})", self.stem, self.filt),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChartGenerator {
    pub name: String,
    pub degree: TriDegree,
}

/// An F2 sum of chart basis elements of one common degree; the empty sum is
/// zero and carries no degree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Expression {
    terms: Vec<usize>, // sorted generator indices
}

impl Expression {
    pub fn zero() -> Self {
        Expression { terms: Vec::new() }
    }

    pub fn single(gen: usize) -> Self {
        Expression { terms: vec![gen] }
    }

    pub fn from_terms(mut terms: Vec<usize>) -> Self {
        terms.sort_unstable();
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            if out.last() == Some(&t) {
                out.pop();
            } else {
                out.push(t);
            }
        }
        Expression { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[usize] {
        &self.terms
    }

    pub fn add(&self, other: &Expression) -> Expression {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Expression::from_terms(terms)
    }
}

/// Result of a product-table lookup.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ProductValue {
    Known(Expression),
    Unknown,
}

impl ProductValue {
    pub fn known(&self) -> Option<&Expression> {
        match self {
            ProductValue::Known(e) => Some(e),
            ProductValue::Unknown => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ChartMetadata {
    pub name: Option<String>,
    pub notes: Option<String>,
    /// Inclusive stem range the chart describes completely.
    pub complete_stems: Option<(i32, i32)>,
}

/// A finite presented chart algebra over F2.
#[derive(Clone, Debug)]
pub struct ChartAlgebra {
    generators: Vec<ChartGenerator>,
    by_name: BTreeMap<String, usize>,
    by_degree: BTreeMap<(i32, u32, Option<i32>), Vec<usize>>,
    /// Key is the unordered pair (products are commutative mod 2). A present
    /// entry is knowledge; an empty expression is a real zero.
    products: BTreeMap<(usize, usize), Expression>,
    tau: Option<usize>,
    pub metadata: ChartMetadata,
}

fn pair_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl ChartAlgebra {
    pub fn generators(&self) -> &[ChartGenerator] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &ChartGenerator {
        &self.generators[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn tau(&self) -> Option<usize> {
        self.tau
    }

    /// Basis of a degree, in generator declaration order. Empty means zero
    /// inside the census and "no dots listed" outside it.
    pub fn basis(&self, degree: &TriDegree) -> &[usize] {
        self.by_degree
            .get(&(degree.stem, degree.filt, degree.weight))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// True when the chart claims a complete census at this stem.
    pub fn census_contains(&self, stem: i32) -> bool {
        if stem < 0 {
            return true;
        }
        self.metadata
            .complete_stems
            .map(|(lo, hi)| stem >= lo && stem <= hi)
            .unwrap_or(false)
    }

    /// Degree of an expression; zero expressions have no degree.
    pub fn degree_of(&self, e: &Expression) -> Option<TriDegree> {
        e.terms().first().map(|&i| self.generators[i].degree)
    }

    pub fn render(&self, e: &Expression) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        e.terms()
            .iter()
            .map(|&i| self.generators[i].name.clone())
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn parse_expression(&self, names: &[String]) -> Result<Expression, ChartError> {
        let mut terms = Vec::with_capacity(names.len());
        for n in names {
            let i = self
                .index_of(n)
                .ok_or_else(|| ChartError::UnknownName(n.clone()))?;
            terms.push(i);
        }
        let e = Expression::from_terms(terms);
        // Homogeneity.
        if let Some(first) = e.terms().first() {
            let d = self.generators[*first].degree;
            for &i in e.terms() {
                if self.generators[i].degree != d {
                    return Err(ChartError::Inhomogeneous(self.render(&e)));
                }
            }
        }
        Ok(e)
    }

    pub fn product_of_generators(&self, a: usize, b: usize) -> ProductValue {
        match self.products.get(&pair_key(a, b)) {
            Some(e) => ProductValue::Known(e.clone()),
            None => ProductValue::Unknown,
        }
    }

    /// Bilinear extension of the product table. UNKNOWN as soon as one
    /// needed pair is unlisted; zero expressions multiply to zero.
    pub fn multiply(&self, e1: &Expression, e2: &Expression) -> ProductValue {
        if e1.is_zero() || e2.is_zero() {
            return ProductValue::Known(Expression::zero());
        }
        let mut acc = Expression::zero();
        for &a in e1.terms() {
            for &b in e2.terms() {
                match self.product_of_generators(a, b) {
                    ProductValue::Known(p) => acc = acc.add(&p),
                    ProductValue::Unknown => return ProductValue::Unknown,
                }
            }
        }
        ProductValue::Known(acc)
    }

    /// Expression coordinates in the basis of its degree.
    pub fn coords(&self, e: &Expression, degree: &TriDegree) -> crate::f2::BitVec {
        let basis = self.basis(degree);
        let mut v = crate::f2::BitVec::zeros(basis.len());
        for &term in e.terms() {
            let pos = basis
                .iter()
                .position(|&g| g == term)
                .expect("expression term outside the degree basis");
            v.set(pos, true);
        }
        v
    }

    pub fn expression_from_coords(&self, coords: &crate::f2::BitVec, degree: &TriDegree) -> Expression {
        let basis = self.basis(degree);
        Expression::from_terms(coords.iter_set().map(|i| basis[i]).collect())
    }

    /// The generator equal to `tau * g`, when listed and a single term.
    pub fn tau_multiple(&self, g: usize) -> Option<usize> {
        let tau = self.tau?;
        match self.product_of_generators(tau, g) {
            ProductValue::Known(e) if e.terms().len() == 1 => Some(e.terms()[0]),
            _ => None,
        }
    }

    /// Builds a chart from parts, running full validation.
    pub fn build(
        generators: Vec<ChartGenerator>,
        products: Vec<(String, String, Vec<String>)>,
        tau: Option<String>,
        metadata: ChartMetadata,
    ) -> Result<Self, ChartError> {
        let mut issues = Vec::new();
        let mut by_name = BTreeMap::new();
        for (i, g) in generators.iter().enumerate() {
            if by_name.insert(g.name.clone(), i).is_some() {
                issues.push(format!("duplicate generator name {:?}", g.name));
            }
        }
        let weighted = generators.iter().filter(|g| g.degree.weight.is_some()).count();
        if weighted != 0 && weighted != generators.len() {
            issues.push("weights must be present on all generators or none".to_string());
        }
        let mut by_degree: BTreeMap<(i32, u32, Option<i32>), Vec<usize>> = BTreeMap::new();
        for (i, g) in generators.iter().enumerate() {
            by_degree
                .entry((g.degree.stem, g.degree.filt, g.degree.weight))
                .or_default()
                .push(i);
        }
        let tau_idx = match &tau {
            None => None,
            Some(name) => match by_name.get(name) {
                None => {
                    issues.push(format!("tau generator {name:?} is not declared"));
                    None
                }
                Some(&i) => {
                    let d = generators[i].degree;
                    let ok = d.stem == 0
                        && d.filt == 0
                        && (d.weight.is_none() || d.weight == Some(-1));
                    if !ok {
                        issues.push(format!(
                            "tau generator {name:?} has degree {d}, expected (0, 0) with weight -1 when weighted"
                        ));
                    }
                    Some(i)
                }
            },
        };
        let mut table: BTreeMap<(usize, usize), Expression> = BTreeMap::new();
        for (a_name, b_name, value_names) in &products {
            let a = by_name.get(a_name).copied();
            let b = by_name.get(b_name).copied();
            let (Some(a), Some(b)) = (a, b) else {
                issues.push(format!(
                    "product ({a_name}, {b_name}) references an undeclared generator"
                ));
                continue;
            };
            let mut terms = Vec::new();
            let mut bad = false;
            for v in value_names {
                match by_name.get(v) {
                    Some(&i) => terms.push(i),
                    None => {
                        issues.push(format!(
                            "product ({a_name}, {b_name}) value references undeclared {v:?}"
                        ));
                        bad = true;
                    }
                }
            }
            if bad {
                continue;
            }
            let expr = Expression::from_terms(terms);
            let expected = generators[a].degree.plus(&generators[b].degree);
            for &i in expr.terms() {
                if generators[i].degree != expected {
                    issues.push(format!(
                        "product ({a_name}, {b_name}) lands in {expected} but term {:?} has degree {}",
                        generators[i].name, generators[i].degree
                    ));
                }
            }
            let key = pair_key(a, b);
            if let Some(old) = table.get(&key) {
                if old != &expr {
                    issues.push(format!(
                        "product ({a_name}, {b_name}) listed twice with different values"
                    ));
                }
            }
            table.insert(key, expr);
        }
        if !issues.is_empty() {
            return Err(ChartError::Validation(issues));
        }
        Ok(ChartAlgebra {
            generators,
            by_name,
            by_degree,
            products: table,
            tau: tau_idx,
            metadata,
        })
    }

    /// All listed product entries, deterministically ordered.
    pub fn product_entries(&self) -> impl Iterator<Item = (usize, usize, &Expression)> {
        self.products.iter().map(|(&(a, b), e)| (a, b, e))
    }
}

/// Serde mirror of the chart file format.
#[derive(Serialize, Deserialize)]
struct ChartFile {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    notes: Option<String>,
    #[serde(default)]
    complete_stems: Option<(i32, i32)>,
    generators: Vec<ChartFileGenerator>,
    #[serde(default)]
    products: Vec<ChartFileProduct>,
    #[serde(default)]
    tau: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ChartFileGenerator {
    name: String,
    stem: i32,
    s: u32,
    #[serde(default)]
    weight: Option<i32>,
}

#[derive(Serialize, Deserialize)]
struct ChartFileProduct {
    a: String,
    b: String,
    value: Vec<String>,
}

pub fn load_chart(path: &Path) -> Result<ChartAlgebra, ChartError> {
    let text = std::fs::read_to_string(path).map_err(|e| ChartError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_chart(&text).map_err(|e| match e {
        ChartError::Json { source, .. } => ChartError::Json {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

pub fn parse_chart(text: &str) -> Result<ChartAlgebra, ChartError> {
    let file: ChartFile = serde_json::from_str(text).map_err(|e| ChartError::Json {
        path: "<inline>".to_string(),
        source: e,
    })?;
    let generators = file
        .generators
        .into_iter()
        .map(|g| ChartGenerator {
            name: g.name,
            degree: TriDegree {
                stem: g.stem,
                filt: g.s,
                weight: g.weight,
            },
        })
        .collect();
    let products = file
        .products
        .into_iter()
        .map(|p| (p.a, p.b, p.value))
        .collect();
    ChartAlgebra::build(
        generators,
        products,
        file.tau,
        ChartMetadata {
            name: file.name,
            notes: file.notes,
            complete_stems: file.complete_stems,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(name: &str, stem: i32, filt: u32) -> ChartGenerator {
        ChartGenerator {
            name: name.to_string(),
            degree: TriDegree::new(stem, filt),
        }
    }

    #[test]
    fn minimal_chart_loads() {
        let chart = ChartAlgebra::build(
            vec![gen("h0", 0, 1), gen("h0^2", 0, 2)],
            vec![(
                "h0".to_string(),
                "h0".to_string(),
                vec!["h0^2".to_string()],
            )],
            None,
            ChartMetadata::default(),
        )
        .unwrap();
        let h0 = chart.index_of("h0").unwrap();
        let sq = chart.index_of("h0^2").unwrap();
        assert_eq!(
            chart.product_of_generators(h0, h0),
            ProductValue::Known(Expression::single(sq))
        );
    }

    #[test]
    fn degree_mismatch_names_the_pair() {
        let err = ChartAlgebra::build(
            vec![gen("a", 1, 1), gen("b", 2, 1), gen("wrong", 0, 0)],
            vec![(
                "a".to_string(),
                "b".to_string(),
                vec!["wrong".to_string()],
            )],
            None,
            ChartMetadata::default(),
        )
        .unwrap_err();
        let text = err.to_string();
        assert!(text.contains("(a, b)"), "message was: {text}");
    }

    #[test]
    fn validation_is_exhaustive() {
        let err = ChartAlgebra::build(
            vec![gen("a", 1, 1), gen("a", 1, 1)],
            vec![
                ("a".to_string(), "nosuch".to_string(), vec![]),
                ("x".to_string(), "y".to_string(), vec![]),
            ],
            Some("tau".to_string()),
            ChartMetadata::default(),
        )
        .unwrap_err();
        let ChartError::Validation(issues) = err else {
            panic!("expected validation error");
        };
        assert!(issues.len() >= 4, "collected: {issues:?}");
    }

    #[test]
    fn unlisted_pair_is_unknown() {
        let chart = ChartAlgebra::build(
            vec![gen("h0", 0, 1), gen("x", 5, 2)],
            vec![],
            None,
            ChartMetadata::default(),
        )
        .unwrap();
        let h0 = chart.index_of("h0").unwrap();
        let x = chart.index_of("x").unwrap();
        assert_eq!(chart.product_of_generators(h0, x), ProductValue::Unknown);
        // Multiplication by a zero expression is known regardless.
        assert_eq!(
            chart.multiply(&Expression::zero(), &Expression::single(x)),
            ProductValue::Known(Expression::zero())
        );
    }

    #[test]
    fn census_semantics() {
        let chart = ChartAlgebra::build(
            vec![gen("x", 50, 2)],
            vec![],
            None,
            ChartMetadata {
                complete_stems: Some((44, 57)),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(chart.census_contains(51));
        assert!(chart.census_contains(-3));
        assert!(!chart.census_contains(10));
        assert!(chart.basis(&TriDegree::new(51, 7)).is_empty());
    }

    #[test]
    fn inhomogeneous_expression_rejected() {
        let chart = ChartAlgebra::build(
            vec![gen("a", 1, 1), gen("b", 2, 1)],
            vec![],
            None,
            ChartMetadata::default(),
        )
        .unwrap();
        let err = chart
            .parse_expression(&["a".to_string(), "b".to_string()])
            .unwrap_err();
        assert!(matches!(err, ChartError::Inhomogeneous(_)));
    }
}
