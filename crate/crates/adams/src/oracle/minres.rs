//! Minimal free resolution over the Milnor-basis Steenrod algebra.
//!
//! The Steenrod algebra is carried in the Milnor basis: `Sq(r_1, r_2, ...)`
//! of degree `sum r_i (2^i - 1)`, with the product given by Milnor matrices
//!
//! ```text
//! Sq(R) Sq(S) = sum_X b(X) Sq(T(X))
//! ```
//!
//! over matrices `X = (x_ij)` with `sum_j 2^j x_ij = r_i` for `i >= 1` and
//! `sum_i x_ij = s_j` for `j >= 1`, where `T_n = sum_{i+j=n} x_ij` and `b(X)`
//! is the product over `n` of the multinomial coefficients of the
//! anti-diagonals, mod 2.
//!
//! A minimal resolution of F2 is grown degree by degree; the number of new
//! generators required at `(s, t)` equals `dim Ext^{s,t}`, and exactness is
//! asserted (`d о d = 0`) for every generator added. In the range this
//! oracle serves (`t <= ~30`) all matrices stay a few hundred columns wide,
//! so the whole computation is effectively instant.

use std::collections::BTreeMap;

/// Milnor profile `[r_1, r_2, ...]`, no trailing zeros; empty is the unit.
pub type Profile = Vec<u32>;

fn entry_degree(i: usize) -> u32 {
    (1u32 << (i + 1)) - 1
}

pub fn profile_degree(r: &Profile) -> u32 {
    r.iter()
        .enumerate()
        .map(|(i, &e)| e * entry_degree(i))
        .sum()
}

fn trim(mut r: Profile) -> Profile {
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Milnor-basis elements of degree `d`, deterministically ordered.
pub fn milnor_basis(d: u32) -> Vec<Profile> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let max_i = (0..).take_while(|&i| entry_degree(i) <= d).last().unwrap();
    let mut out = Vec::new();
    let mut current = vec![0u32; max_i + 1];
    fn go(out: &mut Vec<Profile>, current: &mut Vec<u32>, i: usize, rem: u32) {
        if i == 0 {
            current[0] = rem;
            out.push(trim(current.clone()));
            current[0] = 0;
            return;
        }
        let deg = entry_degree(i);
        for e in 0..=(rem / deg) {
            current[i] = e;
            go(out, current, i - 1, rem - e * deg);
        }
        current[i] = 0;
    }
    go(&mut out, &mut current, max_i, d);
    out
}

/// True when the multinomial coefficient of `parts` is odd: the binary
/// digits of the parts must be pairwise disjoint.
fn multinomial_odd(parts: &[u32]) -> bool {
    let mut seen = 0u64;
    for &p in parts {
        if seen & p as u64 != 0 {
            return false;
        }
        seen |= p as u64;
    }
    true
}

/// Milnor product `Sq(R) Sq(S)` as an F2 sum of profiles.
pub fn milnor_product(r: &Profile, s: &Profile) -> Vec<Profile> {
    let nr = r.len();
    let ns = s.len();
    // x[i][j] for 0 <= i <= nr, 0 <= j <= ns; x[0][0] unused.
    let mut x = vec![vec![0u32; ns + 1]; nr + 1];
    let mut col_used = vec![0u32; ns + 1];
    let mut acc: BTreeMap<Profile, bool> = BTreeMap::new();

    fn fill_row(
        r: &Profile,
        s: &Profile,
        x: &mut Vec<Vec<u32>>,
        col_used: &mut Vec<u32>,
        i: usize,
        j: usize,
        row_rem: u32,
        acc: &mut BTreeMap<Profile, bool>,
    ) {
        let nr = r.len();
        let ns = s.len();
        if j > ns {
            x[i][0] = row_rem;
            if i == nr {
                finish(r, s, x, col_used, acc);
            } else {
                fill_row(r, s, x, col_used, i + 1, 1, r[i], acc);
            }
            return;
        }
        let weight = 1u32 << j;
        let cap = (row_rem / weight).min(s[j - 1] - col_used[j]);
        for v in 0..=cap {
            x[i][j] = v;
            col_used[j] += v;
            fill_row(r, s, x, col_used, i, j + 1, row_rem - v * weight, acc);
            col_used[j] -= v;
        }
        x[i][j] = 0;
    }

    fn finish(
        r: &Profile,
        s: &Profile,
        x: &[Vec<u32>],
        col_used: &[u32],
        acc: &mut BTreeMap<Profile, bool>,
    ) {
        let nr = r.len();
        let ns = s.len();
        let mut t = vec![0u32; nr + ns];
        for n in 1..=(nr + ns) {
            let mut parts = Vec::new();
            for i in 0..=n.min(nr) {
                let j = n - i;
                if j > ns {
                    continue;
                }
                let v = if i == 0 {
                    s[j - 1] - col_used[j]
                } else if j == 0 {
                    x[i][0]
                } else {
                    x[i][j]
                };
                parts.push(v);
            }
            if !multinomial_odd(&parts) {
                return;
            }
            t[n - 1] = parts.iter().sum();
        }
        let key = trim(t);
        match acc.entry(key) {
            std::collections::btree_map::Entry::Occupied(e) => {
                e.remove();
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(true);
            }
        }
    }

    if nr == 0 {
        return vec![s.clone()];
    }
    fill_row(r, s, &mut x, &mut col_used, 1, 1, r[0], &mut acc);
    acc.into_keys().collect()
}

/// One term `m * g_k` of a free-module element.
type FreeTerm = (usize, Profile);
/// An F2 sum of free-module terms, kept sorted and canceled.
type FreeElement = Vec<FreeTerm>;

fn add_term(e: &mut FreeElement, term: FreeTerm) {
    match e.binary_search(&term) {
        Ok(pos) => {
            e.remove(pos);
        }
        Err(pos) => e.insert(pos, term),
    }
}

/// Left action `a * e` on a free-module element.
fn act(a: &Profile, e: &FreeElement) -> FreeElement {
    let mut out = Vec::new();
    for (gen, m) in e {
        for product in milnor_product(a, m) {
            add_term(&mut out, (*gen, product));
        }
    }
    out
}

/// Row-echelon accumulator with optional augmentation, packed 64 bits/word.
struct Echelon {
    cols: usize,
    rows: Vec<(Vec<u64>, usize)>, // (row, pivot)
}

impl Echelon {
    fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows: Vec::new(),
        }
    }

    fn reduce(&self, v: &mut [u64]) {
        for (row, pivot) in &self.rows {
            if v[pivot / 64] & (1u64 << (pivot % 64)) != 0 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
    }

    /// Reduces and inserts; returns false when the vector was dependent.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        self.reduce(&mut v);
        let Some(pivot) = first_set(&v, self.cols) else {
            return false;
        };
        self.rows.push((v, pivot));
        true
    }
}

fn first_set(v: &[u64], cols: usize) -> Option<usize> {
    for (w, word) in v.iter().enumerate() {
        if *word != 0 {
            let bit = w * 64 + word.trailing_zeros() as usize;
            return (bit < cols).then_some(bit);
        }
    }
    None
}

/// The resolution itself: generator degrees per homological degree.
pub struct MinimalResolution {
    /// `gens[s]` lists the internal degrees of the generators of `F_s`.
    gens: Vec<Vec<u32>>,
    /// `diffs[s][k]` is the image of generator `k` of `F_s` in `F_{s-1}`.
    diffs: Vec<Vec<FreeElement>>,
    max_t: u32,
}

impl MinimalResolution {
    /// Basis of `(F_s)_t` as (generator, Milnor monomial) pairs.
    fn module_basis(&self, s: usize, t: u32) -> Vec<FreeTerm> {
        let mut out = Vec::new();
        for (k, &d) in self.gens[s].iter().enumerate() {
            if d > t {
                continue;
            }
            for m in milnor_basis(t - d) {
                out.push((k, m));
            }
        }
        out
    }

    fn pack(basis_index: &BTreeMap<FreeTerm, usize>, e: &FreeElement, cols: usize) -> Vec<u64> {
        let mut v = vec![0u64; cols.div_ceil(64)];
        for term in e {
            let j = *basis_index
                .get(term)
                .expect("free-module term outside the degree basis");
            v[j / 64] ^= 1u64 << (j % 64);
        }
        v
    }

    /// Builds the resolution through filtration `max_s` and degree `max_t`.
    pub fn build(max_s: u32, max_t: u32) -> Self {
        let mut res = MinimalResolution {
            gens: vec![vec![0]],
            diffs: vec![vec![Vec::new()]],
            max_t,
        };
        for s in 1..=max_s as usize {
            res.gens.push(Vec::new());
            res.diffs.push(Vec::new());
            for t in (s as u32)..=max_t {
                res.extend_degree(s, t);
            }
        }
        res
    }

    fn extend_degree(&mut self, s: usize, t: u32) {
        // Kernel of d_{s-1} on (F_{s-1})_t.
        let lower_basis = self.module_basis(s - 1, t);
        if lower_basis.is_empty() {
            return;
        }
        let lower_index: BTreeMap<FreeTerm, usize> = lower_basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, b)| (b, i))
            .collect();
        let n = lower_basis.len();

        let kernel: Vec<Vec<u64>> = if s == 1 {
            // d_0 is the augmentation; in positive degree everything is a cycle.
            (0..n)
                .map(|j| {
                    let mut v = vec![0u64; n.div_ceil(64)];
                    v[j / 64] |= 1u64 << (j % 64);
                    v
                })
                .collect()
        } else {
            let target_basis = self.module_basis(s - 2, t);
            let target_index: BTreeMap<FreeTerm, usize> = target_basis
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, b)| (b, i))
                .collect();
            let aug_words = n.div_ceil(64);
            let mut kernel = Vec::new();
            let mut aug_rows: Vec<(Vec<u64>, Vec<u64>, usize)> = Vec::new();
            for (j, (gen, m)) in lower_basis.iter().enumerate() {
                let image = act(m, &self.diffs[s - 1][*gen]);
                let mut v = Self::pack(&target_index, &image, target_basis.len().max(1));
                let mut aug = vec![0u64; aug_words];
                aug[j / 64] |= 1u64 << (j % 64);
                for (row, aug_row, pivot) in &aug_rows {
                    if v[pivot / 64] & (1u64 << (pivot % 64)) != 0 {
                        for (a, b) in v.iter_mut().zip(row) {
                            *a ^= b;
                        }
                        for (a, b) in aug.iter_mut().zip(aug_row) {
                            *a ^= b;
                        }
                    }
                }
                match first_set(&v, target_basis.len().max(1)) {
                    None => kernel.push(aug),
                    Some(p) => aug_rows.push((v, aug, p)),
                }
            }
            kernel
        };

        // Image of d_s from the generators added so far.
        let mut image_ech = Echelon::new(n);
        for (k, &d) in self.gens[s].iter().enumerate() {
            debug_assert!(d <= t);
            for m in milnor_basis(t - d) {
                let image = act(&m, &self.diffs[s][k]);
                image_ech.insert(Self::pack(&lower_index, &image, n));
            }
        }

        // Each kernel vector that survives reduction mod the image spawns a
        // generator; its differential is the reduced representative.
        for kv in kernel {
            let mut v = kv;
            image_ech.reduce(&mut v);
            if first_set(&v, n).is_none() {
                continue;
            }
            let mut elem: FreeElement = Vec::new();
            for (j, term) in lower_basis.iter().enumerate() {
                if v[j / 64] & (1u64 << (j % 64)) != 0 {
                    add_term(&mut elem, term.clone());
                }
            }
            // d o d = 0 must hold for the new generator.
            if s >= 2 {
                let mut check: FreeElement = Vec::new();
                for (gen, m) in &elem {
                    for term in act(m, &self.diffs[s - 1][*gen]) {
                        add_term(&mut check, term);
                    }
                }
                assert!(
                    check.is_empty(),
                    "resolution differential does not square to zero at (s={s}, t={t})"
                );
            }
            self.gens[s].push(t);
            self.diffs[s].push(elem.clone());
            image_ech.insert(v);
        }
    }

    /// `dim Ext^{s,t}` table; zero entries omitted.
    pub fn ext_dims(&self) -> BTreeMap<(u32, u32), usize> {
        let mut out = BTreeMap::new();
        for (s, gens) in self.gens.iter().enumerate() {
            for &t in gens {
                if t <= self.max_t {
                    *out.entry((s as u32, t)).or_insert(0) += 1;
                }
            }
        }
        out
    }
}

/// Ext dimensions over the Steenrod algebra from a minimal resolution.
pub fn minres_ext_dims(max_t: u32, max_s: u32) -> BTreeMap<(u32, u32), usize> {
    MinimalResolution::build(max_s, max_t).ext_dims()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(r: &[u32]) -> Profile {
        r.to_vec()
    }

    #[test]
    fn milnor_basis_counts() {
        assert_eq!(milnor_basis(0), vec![Vec::<u32>::new()]);
        assert_eq!(milnor_basis(1), vec![vec![1]]);
        // Degree 7: (7), (4,1), (1,2), (0,0,1).
        assert_eq!(milnor_basis(7).len(), 4);
    }

    #[test]
    fn milnor_products_known() {
        // Sq(1) Sq(1) = 0.
        assert!(milnor_product(&sq(&[1]), &sq(&[1])).is_empty());
        // Sq(1) Sq(2) = Sq(3).
        assert_eq!(milnor_product(&sq(&[1]), &sq(&[2])), vec![sq(&[3])]);
        // Sq(2) Sq(2) = Sq(1,1).
        assert_eq!(milnor_product(&sq(&[2]), &sq(&[2])), vec![sq(&[1, 1])]);
        // Sq(2) Sq(1) = Sq(0,1) + Sq(3).
        assert_eq!(
            milnor_product(&sq(&[2]), &sq(&[1])),
            vec![sq(&[0, 1]), sq(&[3])]
        );
        // Unit on either side.
        assert_eq!(milnor_product(&sq(&[]), &sq(&[5])), vec![sq(&[5])]);
        assert_eq!(milnor_product(&sq(&[5]), &sq(&[])), vec![sq(&[5])]);
    }

    #[test]
    fn milnor_associative_sample() {
        let elems = [sq(&[1]), sq(&[2]), sq(&[3]), sq(&[0, 1]), sq(&[4])];
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    let mut left: BTreeMap<Profile, bool> = BTreeMap::new();
                    for ab in milnor_product(a, b) {
                        for t in milnor_product(&ab, c) {
                            match left.entry(t) {
                                std::collections::btree_map::Entry::Occupied(e) => {
                                    e.remove();
                                }
                                std::collections::btree_map::Entry::Vacant(v) => {
                                    v.insert(true);
                                }
                            }
                        }
                    }
                    let mut right: BTreeMap<Profile, bool> = BTreeMap::new();
                    for bc in milnor_product(b, c) {
                        for t in milnor_product(a, &bc) {
                            match right.entry(t) {
                                std::collections::btree_map::Entry::Occupied(e) => {
                                    e.remove();
                                }
                                std::collections::btree_map::Entry::Vacant(v) => {
                                    v.insert(true);
                                }
                            }
                        }
                    }
                    assert_eq!(left, right, "associativity failed: {a:?} {b:?} {c:?}");
                }
            }
        }
    }

    #[test]
    fn ext_low_degrees() {
        let dims = minres_ext_dims(12, 12);
        assert_eq!(dims.get(&(0, 0)), Some(&1));
        for t in 1..=12 {
            let expect = [1, 2, 4, 8].contains(&t);
            assert_eq!(dims.get(&(1, t)).is_some(), expect, "t = {t}");
        }
        for s in 1..=12 {
            assert_eq!(dims.get(&(s, s)), Some(&1), "h_0^{s}");
        }
        assert_eq!(dims.get(&(2, 3)), None); // h_0 h_1 = 0
        assert_eq!(dims.get(&(2, 6)), None); // h_1 h_2 = 0
        assert_eq!(dims.get(&(2, 5)), Some(&1)); // h_0 h_2 detects 2*nu
        assert_eq!(dims.get(&(2, 10)), Some(&1)); // h_1 h_3 detects eta*sigma
        assert_eq!(dims.get(&(3, 11)), Some(&1)); // c_0
    }
}
