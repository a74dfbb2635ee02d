//! Catalog of standard element names and where they live.
//!
//! Names bind to computed classes by bidegree, plus a pinned tag where one is
//! established. Tags for `D1` and `G` come from the Lambda-algebra
//! representatives with leading terms `l4 l7 l11 l15 l15` and
//! `l2 l4 l7 l11 l15 l15`; the `h_i` tags are forced (each is the unique
//! admissible monomial in its bidegree).

use std::collections::BTreeMap;

use crate::lambda::Monomial;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub stem: u32,
    pub s: u32,
    pub tag: Option<Monomial>,
}

#[derive(Clone, Debug, Default)]
pub struct NameCatalog {
    entries: BTreeMap<String, CatalogEntry>,
}

impl NameCatalog {
    pub fn new() -> Self {
        NameCatalog::default()
    }

    pub fn insert(&mut self, name: &str, stem: u32, s: u32, tag: Option<&str>) {
        let tag = tag.map(|t| t.parse().expect("catalog tags are well-formed"));
        self.entries
            .insert(name.to_string(), CatalogEntry { stem, s, tag });
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.get(name)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &CatalogEntry)> {
        self.entries.iter()
    }
}

/// The names used throughout the charts and the CLI.
pub fn standard_catalog() -> NameCatalog {
    let mut c = NameCatalog::new();
    c.insert("h0", 0, 1, Some("l0"));
    c.insert("h1", 1, 1, Some("l1"));
    c.insert("h2", 3, 1, Some("l3"));
    c.insert("h3", 7, 1, Some("l7"));
    c.insert("h4", 15, 1, Some("l15"));
    c.insert("h5", 31, 1, Some("l31"));
    c.insert("c0", 8, 3, None);
    c.insert("d0", 14, 4, None);
    c.insert("e0", 17, 4, None);
    c.insert("g", 20, 4, None);
    c.insert("n", 31, 5, None);
    c.insert("g2", 44, 4, None);
    c.insert("B2", 48, 7, None);
    c.insert("D1", 52, 5, Some("l4 l7 l11 l15 l15"));
    c.insert("G", 54, 6, Some("l2 l4 l7 l11 l15 l15"));
    c.insert("P6h2", 51, 25, None);
    c
}
