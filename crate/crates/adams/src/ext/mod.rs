//! The Adams E2 page as the homology of the Lambda complex.
//!
//! Internal degree `t` is preserved by the differential, so each `t` column
//! is an independent chain complex; slices are computed per `t`, in parallel
//! when asked, and cached on disk for long runs. Homology representatives
//! are pinned deterministically: kernel vectors are reduced against the
//! boundary space in RREF and echelonized among themselves, so every class
//! has a distinct lexicographically-least admissible monomial, its tag.

mod catalog;
mod store;

pub use catalog::{standard_catalog, CatalogEntry, NameCatalog};

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2::{quotient_representatives, span_rref, BitMatrix, BitVec};
use crate::lambda::{
    admissible_basis, differential, differential_monomial, Bidegree, Element, LambdaError,
    Monomial,
};

/// Identifier of the representative/tag convention, stored in cache headers
/// and echoed in exports: RREF-reduced representatives tagged by their
/// lexicographically least admissible monomial.
pub const TAG_CONVENTION: u32 = 1;
pub const TAG_CONVENTION_TEXT: &str =
    "representatives reduced against boundaries in RREF; tag = lexicographically least term; \
     monomial order = lexicographic on index sequences";

#[derive(Debug, Error)]
pub enum ExtError {
    #[error(transparent)]
    Lambda(#[from] LambdaError),
    #[error("resource budget exceeded at t={t}: slice needs about {needed} bytes, budget is {budget}")]
    Budget { t: u32, needed: u64, budget: u64 },
    #[error("cache i/o error at {path}: {source}")]
    CacheIo {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cache file {path} has an incompatible header ({reason})")]
    CacheFormat { path: PathBuf, reason: String },
    #[error("catalog entry {name} expects a class at stem {stem}, filtration {s}, but none was computed")]
    MissingClass { name: String, stem: u32, s: u32 },
}

/// An E2 class: a cycle representative, its tag, and an optional name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass {
    pub bidegree: Bidegree,
    pub representative: Element,
    pub tag: Monomial,
    pub name: Option<String>,
}

/// All homology data for one internal degree `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub t: u32,
    /// Classes per filtration `s`, indexed by `s`.
    pub classes: Vec<Vec<HomologyClass>>,
}

impl Slice {
    pub fn dim(&self, s: u32) -> usize {
        self.classes
            .get(s as usize)
            .map(|c| c.len())
            .unwrap_or(0)
    }
}

/// Engine options: cache location and a memory ceiling for slice matrices.
#[derive(Clone, Debug)]
pub struct ExtOptions {
    pub cache_dir: Option<PathBuf>,
    pub budget_bytes: u64,
}

impl Default for ExtOptions {
    fn default() -> Self {
        ExtOptions {
            cache_dir: None,
            budget_bytes: 6 * 1024 * 1024 * 1024,
        }
    }
}

/// Computes and caches homology slices of the Lambda complex.
pub struct ExtEngine {
    options: ExtOptions,
    slices: Mutex<BTreeMap<u32, Slice>>,
}

/// The matrix of the differential `Lambda^{s,t} -> Lambda^{s+1,t}`:
/// columns indexed by the source admissible basis, rows by the target one.
pub fn differential_matrix(s: u32, t: u32) -> Result<BitMatrix, ExtError> {
    let source = admissible_basis(Bidegree::new(s, t));
    let target = admissible_basis(Bidegree::new(s + 1, t));
    let index: BTreeMap<&Monomial, usize> =
        target.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut m = BitMatrix::zeros(target.len(), source.len());
    for (j, mono) in source.iter().enumerate() {
        for term in differential_monomial(mono)?.terms() {
            let i = index[term];
            m.set(i, j, true);
        }
    }
    Ok(m)
}

fn element_to_vec(e: &Element, basis_index: &BTreeMap<&Monomial, usize>, len: usize) -> BitVec {
    let mut v = BitVec::zeros(len);
    for term in e.terms() {
        v.set(basis_index[term], true);
    }
    v
}

fn vec_to_element(v: &BitVec, basis: &[Monomial], bidegree: Bidegree) -> Element {
    Element::from_terms(bidegree, v.iter_set().map(|i| basis[i].clone()))
}

/// Estimated peak bytes for the slice at internal degree `t`.
fn slice_cost_bytes(t: u32) -> u64 {
    let dims: Vec<u64> = (0..=t + 1)
        .map(|s| admissible_basis(Bidegree::new(s, t)).len() as u64)
        .collect();
    let mut worst = 0u64;
    for s in 0..dims.len().saturating_sub(1) {
        let cost = dims[s] * dims[s + 1] / 8 + dims[s] * dims[s] / 8;
        worst = worst.max(cost);
    }
    // Two adjacent matrices are alive at once during homology.
    worst * 2
}

/// Homology of the Lambda complex at one bidegree; standalone helper used by
/// both the engine and the Massey machinery.
pub fn homology_at(s: u32, t: u32) -> Result<Vec<HomologyClass>, ExtError> {
    let basis = admissible_basis(Bidegree::new(s, t));
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let d_out = differential_matrix(s, t)?;
    let kernel = d_out.kernel_basis();
    if kernel.is_empty() {
        return Ok(Vec::new());
    }
    let boundaries: Vec<BitVec> = if s == 0 {
        Vec::new()
    } else {
        let d_in = differential_matrix(s - 1, t)?;
        (0..d_in.ncols()).map(|j| d_in.column(j)).collect()
    };
    let reps = quotient_representatives(&boundaries, &kernel, basis.len())
        .expect("boundaries are cycles");
    let bidegree = Bidegree::new(s, t);
    let mut classes: Vec<HomologyClass> = reps
        .iter()
        .map(|v| {
            let representative = vec_to_element(v, &basis, bidegree);
            let tag = representative
                .leading_term()
                .expect("representatives are nonzero")
                .clone();
            HomologyClass {
                bidegree,
                representative,
                tag,
                name: None,
            }
        })
        .collect();
    classes.sort_by(|a, b| a.tag.cmp(&b.tag));
    Ok(classes)
}

fn compute_slice(t: u32, budget_bytes: u64) -> Result<Slice, ExtError> {
    let needed = slice_cost_bytes(t);
    if needed > budget_bytes {
        return Err(ExtError::Budget {
            t,
            needed,
            budget: budget_bytes,
        });
    }
    let mut classes = Vec::new();
    for s in 0..=t {
        classes.push(homology_at(s, t)?);
    }
    Ok(Slice { t, classes })
}

impl ExtEngine {
    pub fn new(options: ExtOptions) -> Self {
        ExtEngine {
            options,
            slices: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn in_memory() -> Self {
        ExtEngine::new(ExtOptions {
            cache_dir: None,
            ..ExtOptions::default()
        })
    }

    /// The homology slice at internal degree `t`, from memory, disk, or a
    /// fresh computation (cached afterwards).
    pub fn slice(&self, t: u32) -> Result<Slice, ExtError> {
        if let Some(s) = self.slices.lock().unwrap().get(&t) {
            return Ok(s.clone());
        }
        if let Some(dir) = &self.options.cache_dir {
            if let Some(slice) = store::load_slice(dir, t)? {
                self.slices.lock().unwrap().insert(t, slice.clone());
                return Ok(slice);
            }
        }
        let slice = compute_slice(t, self.options.budget_bytes)?;
        if let Some(dir) = &self.options.cache_dir {
            store::save_slice(dir, &slice)?;
        }
        self.slices.lock().unwrap().insert(t, slice.clone());
        Ok(slice)
    }

    /// Ensures every `t <= max_t` is computed; slices run in parallel and the
    /// result is independent of scheduling.
    pub fn compute_through(&self, max_t: u32) -> Result<(), ExtError> {
        let missing: Vec<u32> = {
            let held = self.slices.lock().unwrap();
            (0..=max_t).filter(|t| !held.contains_key(t)).collect()
        };
        let results: Vec<Result<Slice, ExtError>> =
            missing.par_iter().map(|&t| self.slice_uncached(t)).collect();
        let mut held = self.slices.lock().unwrap();
        for r in results {
            let slice = r?;
            held.insert(slice.t, slice);
        }
        Ok(())
    }

    fn slice_uncached(&self, t: u32) -> Result<Slice, ExtError> {
        if let Some(dir) = &self.options.cache_dir {
            if let Some(slice) = store::load_slice(dir, t)? {
                return Ok(slice);
            }
        }
        let slice = compute_slice(t, self.options.budget_bytes)?;
        if let Some(dir) = &self.options.cache_dir {
            store::save_slice(dir, &slice)?;
        }
        Ok(slice)
    }

    pub fn homology_basis(&self, s: u32, t: u32) -> Result<Vec<HomologyClass>, ExtError> {
        Ok(self
            .slice(t)?
            .classes
            .get(s as usize)
            .cloned()
            .unwrap_or_default())
    }

    /// Table of `dim Ext^{s,t}` for all `t <= max_t`; zero entries omitted.
    pub fn ext_dimensions(&self, max_t: u32) -> Result<BTreeMap<(u32, u32), usize>, ExtError> {
        self.compute_through(max_t)?;
        let mut out = BTreeMap::new();
        for t in 0..=max_t {
            let slice = self.slice(t)?;
            for (s, classes) in slice.classes.iter().enumerate() {
                if !classes.is_empty() {
                    out.insert((s as u32, t), classes.len());
                }
            }
        }
        Ok(out)
    }

    /// Finds `u` with `d(u) = e`; `None` when `e` is not a boundary.
    pub fn bound_by(&self, e: &Element) -> Result<Option<Element>, ExtError> {
        if e.is_zero() {
            let b = e.bidegree();
            return Ok(Some(Element::zero(Bidegree::new(b.s.saturating_sub(1), b.t))));
        }
        let b = e.bidegree();
        if b.s == 0 {
            return Ok(None);
        }
        let (s, t) = (b.s - 1, b.t);
        let target_basis = admissible_basis(b);
        let index: BTreeMap<&Monomial, usize> =
            target_basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let matrix = differential_matrix(s, t)?;
        let target = element_to_vec(e, &index, target_basis.len());
        let source_basis = admissible_basis(Bidegree::new(s, t));
        Ok(matrix
            .solve(&target)
            .map(|x| vec_to_element(&x, &source_basis, Bidegree::new(s, t))))
    }

    /// Coordinates of a cycle in the homology basis at its bidegree.
    ///
    /// Returns `None` when `e` is not a cycle. A boundary yields the zero
    /// vector.
    pub fn class_coordinates(&self, e: &Element) -> Result<Option<BitVec>, ExtError> {
        let b = e.bidegree();
        let classes = self.homology_basis(b.s, b.t)?;
        let basis = admissible_basis(b);
        let index: BTreeMap<&Monomial, usize> =
            basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        if !differential(e)?.is_zero() {
            return Ok(None);
        }
        let v = element_to_vec(e, &index, basis.len());
        let boundaries: Vec<BitVec> = if b.s == 0 {
            Vec::new()
        } else {
            let d_in = differential_matrix(b.s - 1, b.t)?;
            (0..d_in.ncols()).map(|j| d_in.column(j)).collect()
        };
        let boundary_rref = span_rref(&boundaries, basis.len());
        let reduced = boundary_rref.reduce(&v);
        // Solve for the coordinates in the (boundary-reduced) class reps.
        let mut m = BitMatrix::zeros(basis.len(), classes.len());
        for (j, class) in classes.iter().enumerate() {
            let rep = element_to_vec(&class.representative, &index, basis.len());
            for i in rep.iter_set() {
                m.set(i, j, true);
            }
        }
        Ok(m.solve(&reduced))
    }

    /// Attaches catalog names to computed classes.
    ///
    /// A name binds when the bidegree matches and, if the catalog pins a tag,
    /// the tag matches. Catalog entries whose internal degree exceeds the
    /// computed range are skipped; in-range entries with no class at their
    /// bidegree are hard errors. Ambiguous entries (several classes, no tag
    /// pinned) are reported, never guessed.
    pub fn identify(
        &self,
        catalog: &NameCatalog,
        max_t: u32,
    ) -> Result<Vec<IdentifyIssue>, ExtError> {
        let mut issues = Vec::new();
        for (name, entry) in catalog.entries() {
            let t = entry.stem + entry.s;
            if t > max_t {
                continue;
            }
            let classes = self.homology_basis(entry.s, t)?;
            if classes.is_empty() {
                return Err(ExtError::MissingClass {
                    name: name.clone(),
                    stem: entry.stem,
                    s: entry.s,
                });
            }
            let matched: Vec<usize> = match &entry.tag {
                Some(tag) => classes
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| &c.tag == tag)
                    .map(|(i, _)| i)
                    .collect(),
                None => (0..classes.len()).collect(),
            };
            match matched.len() {
                1 => {
                    let mut held = self.slices.lock().unwrap();
                    let slice = held.get_mut(&t).expect("slice just computed");
                    slice.classes[entry.s as usize][matched[0]].name = Some(name.clone());
                }
                0 => {
                    return Err(ExtError::MissingClass {
                        name: name.clone(),
                        stem: entry.stem,
                        s: entry.s,
                    })
                }
                _ => issues.push(IdentifyIssue {
                    name: name.clone(),
                    stem: entry.stem,
                    s: entry.s,
                    candidates: matched.len(),
                }),
            }
        }
        Ok(issues)
    }

    /// Resolves a CLI-facing class name: a catalog name (`D1`), a power of
    /// one (`h2^2`), or a quoted tag (`l4 l7 l11 l15 l15`).
    pub fn resolve_class(&self, name: &str) -> Result<Option<HomologyClass>, ExtError> {
        let catalog = standard_catalog();
        let (base, power) = match name.split_once('^') {
            Some((b, p)) => (b, p.parse::<u32>().unwrap_or(0)),
            None => (name, 1),
        };
        if power == 0 {
            return Ok(None);
        }
        if let Some(entry) = catalog.get(base) {
            let t = entry.stem + entry.s;
            let classes = self.homology_basis(entry.s, t)?;
            let class = match &entry.tag {
                Some(tag) => classes.iter().find(|c| &c.tag == tag).cloned(),
                None => (classes.len() == 1).then(|| classes[0].clone()),
            };
            let Some(class) = class else { return Ok(None) };
            if power == 1 {
                let mut named = class;
                named.name = Some(base.to_string());
                return Ok(Some(named));
            }
            let mut rep = class.representative.clone();
            for _ in 1..power {
                rep = crate::lambda::product(&rep, &class.representative)?;
            }
            let coords = self.class_coordinates(&rep)?;
            if coords.map(|c| c.is_zero()).unwrap_or(true) {
                return Ok(None);
            }
            let tag = rep.leading_term().cloned().expect("nonzero power");
            return Ok(Some(HomologyClass {
                bidegree: rep.bidegree(),
                representative: rep,
                tag,
                name: Some(name.to_string()),
            }));
        }
        // Fall back to a tag string.
        let Ok(tag) = name.parse::<Monomial>() else {
            return Ok(None);
        };
        let b = tag.bidegree();
        Ok(self
            .homology_basis(b.s, b.t)?
            .into_iter()
            .find(|c| c.tag == tag))
    }
}

/// A catalog entry that matched more than one class.
#[derive(Clone, Debug)]
pub struct IdentifyIssue {
    pub name: String,
    pub stem: u32,
    pub s: u32,
    pub candidates: usize,
}

/// JSON export of an Ext table, one record per class.
#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
pub struct ExtExport {
    pub classes: Vec<ExtExportClass>,
    pub convention: String,
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
pub struct ExtExportClass {
    pub stem: u32,
    pub s: u32,
    pub t: u32,
    pub tag: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl ExtEngine {
    pub fn export(&self, max_t: u32) -> Result<ExtExport, ExtError> {
        self.compute_through(max_t)?;
        let mut classes = Vec::new();
        for t in 0..=max_t {
            let slice = self.slice(t)?;
            for (s, cs) in slice.classes.iter().enumerate() {
                for c in cs {
                    classes.push(ExtExportClass {
                        stem: t - s as u32,
                        s: s as u32,
                        t,
                        tag: c.tag.to_string(),
                        name: c.name.clone(),
                    });
                }
            }
        }
        Ok(ExtExport {
            classes,
            convention: TAG_CONVENTION_TEXT.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differential_matrix_examples() {
        // (1,3): d(l2) = l1 l0 is the 1x1 matrix [1].
        let m = differential_matrix(1, 3).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (1, 1));
        assert!(m.get(0, 0));
        // (1,1): d(l0) = 0.
        let m = differential_matrix(1, 1).unwrap();
        assert_eq!(m.ncols(), 1);
        assert!(m.column(0).is_zero());
        // (1,5): d(l4) = l3 l0 + l2 l1, a column with two ones.
        let m = differential_matrix(1, 5).unwrap();
        assert_eq!(m.ncols(), 1);
        assert_eq!(m.column(0).count_ones(), 2);
    }

    #[test]
    fn homology_small_bidegrees() {
        // (1,2): h_1, tagged l1.
        let h = homology_at(1, 2).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].tag.to_string(), "l1");
        // (2,2): h_0^2, tagged l0 l0.
        let h = homology_at(2, 2).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].tag.to_string(), "l0 l0");
        // (1,3): empty, since d(l2) != 0.
        assert!(homology_at(1, 3).unwrap().is_empty());
        // (0,0): the unit.
        assert_eq!(homology_at(0, 0).unwrap().len(), 1);
    }

    #[test]
    fn dimensions_match_oracles_small() {
        let engine = ExtEngine::in_memory();
        let dims = engine.ext_dimensions(12).unwrap();
        let oracle = crate::oracle::minres::minres_ext_dims(12, 12);
        assert_eq!(dims, oracle);
    }

    #[test]
    fn bound_by_examples() {
        let engine = ExtEngine::in_memory();
        // l1 l0 = d(l2).
        let e = Element::from_monomial("l1 l0".parse().unwrap());
        let u = engine.bound_by(&e).unwrap().expect("is a boundary");
        assert_eq!(u.to_string(), "l2");
        // Zero bounds zero.
        let z = Element::zero(Bidegree::new(3, 7));
        assert!(engine.bound_by(&z).unwrap().unwrap().is_zero());
        // h_1 is not a boundary.
        let h1 = Element::from_monomial("l1".parse().unwrap());
        assert!(engine.bound_by(&h1).unwrap().is_none());
    }

    #[test]
    fn identify_names_small_range() {
        let engine = ExtEngine::in_memory();
        engine.compute_through(12).unwrap();
        let issues = engine.identify(&standard_catalog(), 12).unwrap();
        assert!(issues.is_empty(), "ambiguities: {issues:?}");
        let h2 = engine.homology_basis(1, 4).unwrap();
        assert_eq!(h2[0].name.as_deref(), Some("h2"));
        let c0 = engine.homology_basis(3, 11).unwrap();
        assert_eq!(c0[0].name.as_deref(), Some("c0"));
    }

    #[test]
    fn resolve_class_names() {
        let engine = ExtEngine::in_memory();
        let h2sq = engine.resolve_class("h2^2").unwrap().expect("h2^2 exists");
        assert_eq!(h2sq.bidegree, Bidegree::new(2, 8));
        let by_tag = engine.resolve_class("l1").unwrap().expect("tag l1");
        assert_eq!(by_tag.bidegree, Bidegree::new(1, 2));
        assert!(engine.resolve_class("nosuch").unwrap().is_none());
    }

    #[test]
    fn class_coordinates_roundtrip() {
        let engine = ExtEngine::in_memory();
        let h = engine.homology_basis(2, 4).unwrap();
        assert_eq!(h.len(), 1);
        let coords = engine
            .class_coordinates(&h[0].representative)
            .unwrap()
            .expect("cycle");
        assert_eq!(coords.count_ones(), 1);
        // A boundary has zero coordinates.
        let b = Element::from_monomial("l1 l0".parse().unwrap());
        let coords = engine.class_coordinates(&b).unwrap().expect("cycle");
        assert!(coords.is_zero());
        // A non-cycle has none.
        let nc = Element::from_monomial("l2".parse().unwrap());
        assert!(engine.class_coordinates(&nc).unwrap().is_none());
    }

    #[test]
    fn budget_exceeded_is_reported() {
        let engine = ExtEngine::new(ExtOptions {
            cache_dir: None,
            budget_bytes: 4,
        });
        let err = engine.slice(12).unwrap_err();
        assert!(matches!(err, ExtError::Budget { t: 12, .. }));
    }
}
