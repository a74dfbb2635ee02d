//! Fact files: imported differentials, Massey products, and hidden-extension
//! knowledge, each with a free-text citation echoed in the deduction log so
//! imported knowledge stays distinguishable from deduced knowledge.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::chart::{ChartAlgebra, ChartError, Expression};

#[derive(Serialize, Deserialize, Debug, Clone, Default)]
pub struct FactsFile {
    #[serde(default)]
    pub differentials: Vec<DifferentialFactFile>,
    #[serde(default)]
    pub massey: Vec<MasseyFactFile>,
    #[serde(default)]
    pub extensions: Vec<ExtensionFactFile>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct DifferentialFactFile {
    pub page: u32,
    pub source: Vec<String>,
    pub value: Vec<String>,
    #[serde(default)]
    pub source_citation: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct MasseyFactFile {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
    pub value: Vec<String>,
    pub strict: bool,
    pub page: u32,
    #[serde(default)]
    pub source_citation: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ExtensionFactFile {
    pub stem: i32,
    pub from: String,
    pub to: String,
    pub status: ExtensionStatus,
    #[serde(default)]
    pub source_citation: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionStatus {
    Present,
    Absent,
    Unknown,
}

/// A differential fact resolved against a chart.
#[derive(Clone, Debug)]
pub struct DifferentialFact {
    pub page: u32,
    pub source: Expression,
    pub value: Expression,
    pub citation: Option<String>,
}

/// A Massey-product fact resolved against a chart.
#[derive(Clone, Debug)]
pub struct MasseyFact {
    pub a: Expression,
    pub b: Expression,
    pub c: Expression,
    pub value: Expression,
    pub strict: bool,
    pub page: u32,
    pub citation: Option<String>,
}

/// A hidden 2-extension fact resolved against a chart.
#[derive(Clone, Debug)]
pub struct ExtensionFact {
    pub stem: i32,
    pub from: usize,
    pub to: usize,
    pub status: ExtensionStatus,
    pub citation: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct Facts {
    pub differentials: Vec<DifferentialFact>,
    pub massey: Vec<MasseyFact>,
    pub extensions: Vec<ExtensionFact>,
}

impl FactsFile {
    pub fn load(path: &Path) -> Result<FactsFile, ChartError> {
        let text = std::fs::read_to_string(path).map_err(|e| ChartError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        serde_json::from_str(&text).map_err(|e| ChartError::Json {
            path: path.display().to_string(),
            source: e,
        })
    }

    /// Resolves names against a chart and checks degree laws.
    pub fn resolve(&self, chart: &ChartAlgebra) -> Result<Facts, ChartError> {
        let mut issues = Vec::new();
        let mut out = Facts::default();
        for (i, d) in self.differentials.iter().enumerate() {
            let source = match chart.parse_expression(&d.source) {
                Ok(e) => e,
                Err(e) => {
                    issues.push(format!("differential #{i}: {e}"));
                    continue;
                }
            };
            let value = match chart.parse_expression(&d.value) {
                Ok(e) => e,
                Err(e) => {
                    issues.push(format!("differential #{i}: {e}"));
                    continue;
                }
            };
            if source.is_zero() {
                issues.push(format!("differential #{i}: zero source"));
                continue;
            }
            if let (Some(sd), Some(vd)) = (chart.degree_of(&source), chart.degree_of(&value)) {
                if sd.d_target(d.page) != vd {
                    issues.push(format!(
                        "differential #{i}: d_{} of degree {sd} must land in {}, not {vd}",
                        d.page,
                        sd.d_target(d.page)
                    ));
                    continue;
                }
            }
            out.differentials.push(DifferentialFact {
                page: d.page,
                source,
                value,
                citation: d.source_citation.clone(),
            });
        }
        for (i, m) in self.massey.iter().enumerate() {
            let parse = |names: &[String], what: &str, issues: &mut Vec<String>| {
                match chart.parse_expression(names) {
                    Ok(e) => Some(e),
                    Err(e) => {
                        issues.push(format!("massey #{i} slot {what}: {e}"));
                        None
                    }
                }
            };
            let Some(a) = parse(&m.a, "a", &mut issues) else {
                continue;
            };
            let Some(b) = parse(&m.b, "b", &mut issues) else {
                continue;
            };
            let Some(c) = parse(&m.c, "c", &mut issues) else {
                continue;
            };
            let Some(value) = parse(&m.value, "value", &mut issues) else {
                continue;
            };
            // Bracket degree law: stems add plus one, filtrations add minus one.
            if let (Some(da), Some(db), Some(dc), Some(dv)) = (
                chart.degree_of(&a),
                chart.degree_of(&b),
                chart.degree_of(&c),
                chart.degree_of(&value),
            ) {
                let expected_stem = da.stem + db.stem + dc.stem + 1;
                let expected_filt = da.filt + db.filt + dc.filt - 1;
                if (dv.stem, dv.filt) != (expected_stem, expected_filt) {
                    issues.push(format!(
                        "massey #{i}: bracket of degrees {da}, {db}, {dc} lands in ({expected_stem}, {expected_filt}), not {dv}"
                    ));
                    continue;
                }
            }
            out.massey.push(MasseyFact {
                a,
                b,
                c,
                value,
                strict: m.strict,
                page: m.page,
                citation: m.source_citation.clone(),
            });
        }
        for (i, e) in self.extensions.iter().enumerate() {
            let from = chart.index_of(&e.from);
            let to = chart.index_of(&e.to);
            let (Some(from), Some(to)) = (from, to) else {
                issues.push(format!(
                    "extension #{i}: unknown generator {:?} or {:?}",
                    e.from, e.to
                ));
                continue;
            };
            let fd = chart.generator(from).degree;
            let td = chart.generator(to).degree;
            if fd.stem != e.stem || td.stem != e.stem {
                issues.push(format!(
                    "extension #{i}: endpoints must live in stem {}, got {fd} and {td}",
                    e.stem
                ));
                continue;
            }
            if td.filt <= fd.filt {
                issues.push(format!(
                    "extension #{i}: target filtration {} must exceed source filtration {}",
                    td.filt, fd.filt
                ));
                continue;
            }
            out.extensions.push(ExtensionFact {
                stem: e.stem,
                from,
                to,
                status: e.status,
                citation: e.source_citation.clone(),
            });
        }
        if issues.is_empty() {
            Ok(out)
        } else {
            Err(ChartError::Validation(issues))
        }
    }
}
