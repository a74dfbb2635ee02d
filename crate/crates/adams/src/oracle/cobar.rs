//! Reduced cobar complex of the dual Steenrod algebra.
//!
//! The dual Steenrod algebra is `F2[xi_1, xi_2, ...]` with `deg xi_n = 2^n - 1`
//! and coproduct
//!
//! ```text
//! psi(xi_n) = sum_{i=0}^{n} xi_{n-i}^{2^i} (x) xi_i        (xi_0 = 1).
//! ```
//!
//! The reduced cobar complex in cohomological degree `s` is spanned by
//! `s`-fold tensors of positive-degree monomials; the differential inserts the
//! reduced coproduct at each position (signs vanish mod 2). Its homology at
//! `(s, t)` is the Adams E2 term `Ext^{s,t}`.
//!
//! Slice dimensions grow like `2.2^t` (hundreds of millions of basis elements
//! by `t = 24`), so this oracle is only practical for small `t`; pair it with
//! the minimal-resolution oracle for deeper checks.

use std::collections::HashMap;

use super::{gf2_rank, packed_row};

/// A monomial in the `xi_n`, stored as exponents `[e_1, e_2, ...]` with no
/// trailing zeros. The empty vector is the unit.
type XiMonomial = Vec<u32>;

fn xi_degree(n: usize) -> u32 {
    (1u32 << n) - 1
}

#[cfg(test)]
fn monomial_degree(m: &[u32]) -> u32 {
    m.iter()
        .enumerate()
        .map(|(i, &e)| e * xi_degree(i + 1))
        .sum()
}

fn trim(mut m: XiMonomial) -> XiMonomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

/// Multiplies exponent vectors.
fn mul(a: &[u32], b: &[u32]) -> XiMonomial {
    let len = a.len().max(b.len());
    let mut out = vec![0u32; len];
    for (i, o) in out.iter_mut().enumerate() {
        *o = a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0);
    }
    out
}

/// All monomials of exact degree `d` (positive), largest generator first in
/// the recursion so the output order is deterministic.
fn monomials_of_degree(d: u32) -> Vec<XiMonomial> {
    let mut out = Vec::new();
    let max_n = (1..).take_while(|&n| xi_degree(n) <= d).last().unwrap_or(0);
    fn go(out: &mut Vec<XiMonomial>, current: &mut Vec<u32>, n: usize, rem: u32) {
        if n == 0 {
            if rem == 0 {
                out.push(trim(current.clone()));
            }
            return;
        }
        if n == 1 {
            // xi_1 has degree 1: the exponent is forced.
            current[0] = rem;
            out.push(trim(current.clone()));
            current[0] = 0;
            return;
        }
        let deg = xi_degree(n);
        for e in 0..=(rem / deg) {
            current[n - 1] = e;
            go(out, current, n - 1, rem - e * deg);
        }
        current[n - 1] = 0;
    }
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut current = vec![0u32; max_n];
    go(&mut out, &mut current, max_n, d);
    out
}

/// The full coproduct of `xi_n^(2^b)`: Frobenius applied to the coproduct of
/// `xi_n`, as a list of (left, right) exponent-vector pairs.
fn coproduct_power(n: usize, b: u32) -> Vec<(XiMonomial, XiMonomial)> {
    let mut out = Vec::new();
    for i in 0..=n {
        // xi_{n-i}^{2^{i+b}} (x) xi_i^{2^b}
        let mut left = Vec::new();
        if n - i > 0 {
            left = vec![0u32; n - i];
            left[n - i - 1] = 1u32 << (i as u32 + b);
        }
        let mut right = Vec::new();
        if i > 0 {
            right = vec![0u32; i];
            right[i - 1] = 1u32 << b;
        }
        out.push((left, right));
    }
    out
}

/// Reduced coproduct of a monomial: the full multiplicative coproduct with
/// the two primitive-side terms removed; F2 cancellation applied.
fn reduced_coproduct(m: &[u32]) -> Vec<(XiMonomial, XiMonomial)> {
    // Start with 1 (x) 1 and multiply in psi(xi_n^{2^b}) per set bit b of e_n.
    let mut acc: HashMap<(XiMonomial, XiMonomial), bool> = HashMap::new();
    acc.insert((Vec::new(), Vec::new()), true);
    for (idx, &e) in m.iter().enumerate() {
        let n = idx + 1;
        let mut bits = e;
        while bits != 0 {
            let b = bits.trailing_zeros();
            bits &= bits - 1;
            let factor = coproduct_power(n, b);
            let mut next: HashMap<(XiMonomial, XiMonomial), bool> = HashMap::new();
            for ((l, r), _) in acc.iter() {
                for (fl, fr) in &factor {
                    let key = (trim(mul(l, fl)), trim(mul(r, fr)));
                    match next.entry(key) {
                        std::collections::hash_map::Entry::Occupied(e) => {
                            e.remove();
                        }
                        std::collections::hash_map::Entry::Vacant(v) => {
                            v.insert(true);
                        }
                    }
                }
            }
            acc = next;
        }
    }
    acc.into_keys()
        .filter(|(l, r)| !l.is_empty() && !r.is_empty())
        .collect()
}

/// Basis of the reduced cobar complex in degree `(s, t)`: `s`-tuples of
/// positive-degree monomials with total degree `t`, in a deterministic order.
fn cobar_basis(s: u32, t: u32) -> Vec<Vec<XiMonomial>> {
    if s == 0 {
        return if t == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut current: Vec<XiMonomial> = Vec::with_capacity(s as usize);
    fn go(out: &mut Vec<Vec<XiMonomial>>, current: &mut Vec<XiMonomial>, s_rem: u32, t_rem: u32) {
        if s_rem == 0 {
            if t_rem == 0 {
                out.push(current.clone());
            }
            return;
        }
        if t_rem < s_rem {
            return;
        }
        for d in 1..=(t_rem - (s_rem - 1)) {
            for m in monomials_of_degree(d) {
                current.push(m);
                go(out, current, s_rem - 1, t_rem - d);
                current.pop();
            }
        }
    }
    go(&mut out, &mut current, s, t);
    out
}

/// The rank of the cobar differential `C^{s,t} -> C^{s+1,t}`.
fn differential_rank(s: u32, t: u32, source: &[Vec<XiMonomial>]) -> usize {
    if source.is_empty() {
        return 0;
    }
    let target = cobar_basis(s + 1, t);
    if target.is_empty() {
        return 0;
    }
    let index: HashMap<&Vec<XiMonomial>, usize> =
        target.iter().enumerate().map(|(i, m)| (m, i)).collect();
    // Rows of the matrix are the images of source elements (row space rank
    // equals column space rank).
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(source.len());
    for tuple in source {
        let mut row = packed_row(target.len());
        for (pos, factor) in tuple.iter().enumerate() {
            for (l, r) in reduced_coproduct(factor) {
                let mut image: Vec<XiMonomial> = Vec::with_capacity(tuple.len() + 1);
                image.extend_from_slice(&tuple[..pos]);
                image.push(l);
                image.push(r);
                image.extend_from_slice(&tuple[pos + 1..]);
                let j = *index
                    .get(&image)
                    .expect("coproduct term outside the target basis");
                row[j / 64] ^= 1u64 << (j % 64);
            }
        }
        rows.push(row);
    }
    gf2_rank(&mut rows, target.len())
}

/// Ext dimensions over the Steenrod algebra for `t <= max_t` and
/// `s <= max_s`, computed from the reduced cobar complex.
///
/// Keys with dimension zero are omitted.
pub fn cobar_ext_dims(max_t: u32, max_s: u32) -> std::collections::BTreeMap<(u32, u32), usize> {
    let mut dims = std::collections::BTreeMap::new();
    dims.insert((0, 0), 1);
    for t in 1..=max_t {
        // rank of d^{s-1} feeding into s.
        let mut rank_in = 0usize;
        let top = max_s.min(t);
        for s in 1..=top {
            let basis = cobar_basis(s, t);
            let rank_out = if s < t {
                differential_rank(s, t, &basis)
            } else {
                0
            };
            let h = basis.len() - rank_out - rank_in;
            if h > 0 {
                dims.insert((s, t), h);
            }
            rank_in = rank_out;
        }
    }
    dims
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        // Degree 7: xi_1^7, xi_1^4 xi_2, xi_1 xi_2^2, xi_3.
        assert_eq!(monomials_of_degree(7).len(), 4);
        assert_eq!(monomials_of_degree(1), vec![vec![1]]);
        assert_eq!(monomials_of_degree(3).len(), 2);
        for d in 1..=9 {
            for m in monomials_of_degree(d) {
                assert_eq!(monomial_degree(&m), d);
            }
        }
    }

    #[test]
    fn xi1_powers_of_two_are_primitive() {
        assert!(reduced_coproduct(&[1]).is_empty());
        assert!(reduced_coproduct(&[2]).is_empty());
        assert!(reduced_coproduct(&[4]).is_empty());
        // xi_1^3 is not primitive.
        assert_eq!(reduced_coproduct(&[3]).len(), 2);
    }

    #[test]
    fn xi2_coproduct() {
        // psi-bar(xi_2) = xi_1^2 (x) xi_1.
        let cp = reduced_coproduct(&[0, 1]);
        assert_eq!(cp, vec![(vec![2], vec![1])]);
    }

    #[test]
    fn low_degree_ext() {
        let dims = cobar_ext_dims(10, 10);
        assert_eq!(dims.get(&(0, 0)), Some(&1));
        // The h_i line: dimension 1 exactly at t = 1, 2, 4, 8.
        for t in 1..=10 {
            let expect = [1, 2, 4, 8].contains(&t);
            assert_eq!(dims.get(&(1, t)).is_some(), expect, "t = {t}");
        }
        // The h_0 tower: dimension 1 at every (s, s).
        for s in 1..=10 {
            assert_eq!(dims.get(&(s, s)), Some(&1), "s = {s}");
        }
        // h_i h_j pattern at s = 2: adjacent products vanish (h_0 h_1 at t = 3,
        // h_1 h_2 at t = 6), non-adjacent ones survive (h_0 h_2 at t = 5).
        assert_eq!(dims.get(&(2, 3)), None);
        assert_eq!(dims.get(&(2, 6)), None);
        assert_eq!(dims.get(&(2, 5)), Some(&1));
        // eta squared lives at (2, 4).
        assert_eq!(dims.get(&(2, 4)), Some(&1));
    }

    #[test]
    fn s2_is_the_h_i_h_j_pattern() {
        let dims = cobar_ext_dims(13, 4);
        // dim Ext^{2,t} = 1 exactly when t = 2^i + 2^j with j != i + 1.
        let expected = [2, 4, 5, 8, 9, 10];
        for t in 2..=13 {
            let want = expected.contains(&t);
            assert_eq!(dims.get(&(2, t)).is_some(), want, "t = {t}");
        }
        // h_2 h_3 (adjacent) would be t = 12.
        assert_eq!(dims.get(&(2, 12)), None);
        // c_0 at (3, 11).
        assert_eq!(dims.get(&(3, 11)), Some(&1));
    }
}
